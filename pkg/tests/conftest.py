import os

from hypothesis import HealthCheck, settings

# fixed seed, at least 20 examples per property
settings.register_profile(
    "repro", derandomize=True, max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repro"))
