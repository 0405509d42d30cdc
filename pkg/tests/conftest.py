import os

from hypothesis import HealthCheck, settings

# every homology run in the test session also checks the Euler-Poincare identity
os.environ.setdefault("STABKIT_CHECK", "1")

settings.register_profile(
    "stabkit",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("stabkit")
