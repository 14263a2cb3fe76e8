"""Tendon-driven gripper kinematics, statics and dynamics."""
import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())
