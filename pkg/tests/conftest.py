from hypothesis import settings

# Symbolic arithmetic on adversarial random inputs is slow by nature; we care
# about correctness, not per-example latency.
settings.register_profile("websmith", deadline=None)
settings.load_profile("websmith")
