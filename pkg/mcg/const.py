import os

universal_options_list = {
    'author': 'mcgraph developers',
    'license': 'GNU GPL v3',
    'version': 'r0.3.0',
    # Randomness
    'default-seed': int(os.environ.get('MCGRAPH_SEED', 20240601)),
    'jobs': max(1, int(os.environ.get('MCGRAPH_JOBS', 1))),
    # Observation graphs
    'eig-size-cap': 8192,
    'tie-tolerance': 1e-9,
    # Factorizations and certificates
    'orthonormal-tolerance': 1e-6,
    'theta-enumeration-cutoff': 200000,
    # Solver
    'svd-size-cap': 2000,
    'solver-penalty-growth': 1.2,
    'solver-max-iters': 500,
    'solver-tol-feas': 1e-7,
    'solver-tol-change': 1e-8,
    # Experiments
    'success-threshold': 0.01,
    'search-attempts': 20,
    'search-step': 0.05,
    # Real data
    'er-density-tolerance': 0.002,
    'er-starvation-factor': 50,
    'desk-subpattern-users': 300,
    'desk-subpattern-items': 300,
    'csv-subset-shape': (3000, 3000),
}

def get_const(_):
    return universal_options_list[_] if _ in universal_options_list else None
