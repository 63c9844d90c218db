from hypothesis import settings

# keep property tests replayable run to run
settings.register_profile("repeatable", derandomize=True, deadline=None)
settings.load_profile("repeatable")
