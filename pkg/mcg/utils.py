import hashlib
import io
import mako
import mako.template
import os
import sys
import time
import uuid

import numpy as np
import pandas as pd
import scipy.io
import scipy.sparse

from . import const
from . import module_error

STATIC_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'static')

################################################################################
# Static data and summaries

def get_static_data(filename):
    """Reads a file shipped under mcg/static/, in bytes."""
    with open(os.path.join(STATIC_DIR, filename), 'rb') as hfile:
        data = hfile.read()
    return data

def get_static_data_utf(filename):
    return get_static_data(filename).decode('utf-8', 'ignore')

def preprocess_summary(template_name, **additional_arguments):
    """Renders a human summary from a mako template in mcg/static/."""
    data = get_static_data_utf(template_name)
    data = mako.template.Template(
        text=data,
        input_encoding='utf-8').render(
            placeholder_version_number = const.get_const('version'),
            fmt = format_number,
            **additional_arguments
        )
    return data

def format_number(value, digits=6):
    if value is None:
        return '-'
    value = float(value)
    if np.isnan(value):
        return '-'
    if np.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return '%.*g' % (digits, value)

################################################################################
# Time operations

def get_timer():
    return time.perf_counter()

def get_elapsed_ms(since):
    """ Milliseconds since a get_timer() reading. """
    return (time.perf_counter() - since) * 1000.0

################################################################################
# Hash and seed operations

def sha512_hex(data):
    if type(data) == str:
        data = data.encode('utf-8', 'ignore')
    return hashlib.sha512(data).hexdigest()

def derive_seed(master_seed, *keys):
    """ Mixes a 64-bit master seed with a sequence of keys (trial index,
    cell identifiers, purpose tags) into an independent 64-bit seed. The
    derivation is a pure function of its arguments, so trials can be drawn
    in any order and still reproduce bit for bit. """
    material = '%d|%s' % (int(master_seed), '|'.join(repr(k) for k in keys))
    return int(sha512_hex(material)[:16], 16)

def get_rng(seed):
    return np.random.default_rng(int(seed) % (2 ** 64))

################################################################################
# UUID operations

def get_new_uuid(uuid_, uuid_list=None):
    """Creates a new UUID that is not in 'uuid_list' if given."""
    if not uuid_:
        uuid_ = uuid.uuid4()
        if type(uuid_list) in [set, dict]:
            while uuid_ in uuid_list:
                uuid_ = uuid.uuid4()
    return uuid_

################################################################################
# Table output

def derive_output_path(input_path, suffix):
    """ 'data/u.data' + '.profile.csv' -> 'data/u.profile.csv' """
    stem, _ = os.path.splitext(str(input_path))
    return stem + suffix

def write_table(target, header, rows, append=False):
    """ Writes rows under 'header' as CSV. 'target' is a path, '-' for
    standard output, or an open text stream. Missing cells (None / NaN) are
    written empty. """
    frame = pd.DataFrame(list(rows), columns=list(header))
    if target == '-':
        frame.to_csv(sys.stdout, index=False, na_rep='')
        return
    if hasattr(target, 'write'):
        frame.to_csv(target, index=False, na_rep='')
        return
    write_header = not (append and os.path.exists(target))
    try:
        frame.to_csv(target, index=False, na_rep='',
            mode='a' if append else 'w', header=write_header)
    except OSError as err:
        raise module_error.McgError('cannot write %s: %s' % (target, err))
    return

################################################################################
# Matrix file operations

def read_dense(path):
    """ Reads a dense matrix from Matrix Market (array or coordinate) or from
    header-free row-major CSV. """
    path = str(path)
    if not os.path.exists(path):
        raise module_error.McgError('no such file: %s' % path)
    try:
        if path.endswith('.mtx'):
            data = scipy.io.mmread(path)
            if scipy.sparse.issparse(data):
                data = data.toarray()
            return np.asarray(data, dtype=np.float64)
        data = np.loadtxt(path, delimiter=',', dtype=np.float64, ndmin=2)
    except ValueError as err:
        raise module_error.ParseError(path, None, str(err))
    return data

def write_dense(target, X, fmt=None):
    """ Writes a dense matrix as CSV (default) or Matrix Market array
    ('mtx', or a path ending in .mtx). """
    X = np.asarray(X, dtype=np.float64)
    if fmt is None:
        fmt = 'mtx' if str(target).endswith('.mtx') else 'csv'
    if target == '-':
        target = sys.stdout
    if fmt == 'mtx':
        buffer = io.BytesIO()
        scipy.io.mmwrite(buffer, X, field='real')
        if hasattr(target, 'write'):
            target.write(buffer.getvalue().decode('utf-8'))
        else:
            with open(str(target), 'wb') as hfile:
                hfile.write(buffer.getvalue())
        return
    np.savetxt(target, X, delimiter=',', fmt='%.17g')
    return

################################################################################
# Command line output

def print_summary(text, to_stderr=False):
    """ Prints a rendered summary; goes to stderr when stdout carries data. """
    stream = sys.stderr if to_stderr else sys.stdout
    stream.write(text if text.endswith('\n') else text + '\n')
    stream.flush()
    return
