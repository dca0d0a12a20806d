"""Interactive Edu: a server-authoritative exergame quiz platform.

A realtime hub bridges a four-segment interactive floor (physical or
simulated) and a quiz display screen, presents teacher-managed
multiple-choice questions, evaluates floor presses, and broadcasts
feedback.
"""

__version__ = "0.1.0"
