def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: statistical acceptance runs taking minutes")
