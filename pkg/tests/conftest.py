from hypothesis import settings

# several oracles are brute force on purpose; per-example wall-clock limits only add flakiness
settings.register_profile("suite", deadline=None)
settings.load_profile("suite")
