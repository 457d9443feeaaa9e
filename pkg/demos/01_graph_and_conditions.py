"""
Communication graph and feasibility conditions
==============================================

Build the four-follower graph, inspect L and C, and evaluate the three
gain/duty-cycle conditions for a couple of parameter choices.
"""
import numpy as np

from resilient_dmfac import CommGraph, MfacGains, check_conditions, format_report
from resilient_dmfac.topology import is_connected_with_leader_access, laplacian, max_row_gain

# row i lists who follower i listens to; followers 1 and 3 see the leader
graph = CommGraph([[0, 0, 0, 1], [1, 0, 1, 0], [0, 1, 0, 0], [1, 0, 1, 0]], [1, 0, 1, 0])
pair = laplacian(graph)
print("L =\n", pair.laplacian)
print("C =", np.diag(pair.pin_matrix))
print("strongly connected with leader access:", is_connected_with_leader_access(graph))
print("max row gain:", max_row_gain(graph))

# (L + C) has positive-real-part eigenvalues when the leader reaches everyone
print("eig(L + C):", np.round(np.linalg.eigvals(pair.gain_matrix), 4))

tl = MfacGains(gamma=0.6, lam=1.0)
cp = MfacGains(gamma=0.8, lam=1.0)
print(format_report(check_conditions(1.5, 1.5, tl, cp, graph, 0.9, 1.05, beta=0.2)))

# a smaller control penalty breaks the twin-layer gain condition
print(format_report(check_conditions(1.5, 1.5, MfacGains(gamma=0.6, lam=0.01), cp, graph,
                                     0.9, 1.05, beta=0.2)))
