import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile("fast", max_examples=5, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("debugger", max_examples=1, deadline=None, report_multiple_bugs=False)
settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

np.seterr(all="warn")
