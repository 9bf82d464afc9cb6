import os

import numpy as np
import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get('MCGRAPH_SLOW') == '1':
        return
    skip = pytest.mark.skip(reason='acceptance experiment, set MCGRAPH_SLOW=1 to run')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def ml100k_path():
    path = os.environ.get('MCGRAPH_ML100K')
    if not path or not os.path.exists(path):
        pytest.skip('MCGRAPH_ML100K does not point at the MovieLens 100K u.data file')
    return path


@pytest.fixture
def write_text(tmp_path):
    def write(name, text):
        target = tmp_path / name
        target.write_text(text, encoding='utf-8')
        return str(target)
    return write
