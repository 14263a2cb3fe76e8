"""Tendon force chain: moments, tension, torque, payload, wire sizing."""
