"""metamorph: simulator and verification harness for metamorphic robotic
systems on a walled square grid."""

__version__ = "0.1.0"
