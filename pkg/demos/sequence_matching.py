"""
Single frames versus sequences
==============================

Describe both traverses with HOG, build the cosine similarity matrix and
compare single-frame matching with sequence matching over K frames.
"""

from seqvpr import (
    accuracy, best_match_sequence, best_match_single, hog_descriptor_set,
    minimal_k, similarity_matrix,
)
from seqvpr.jpeg import compress_set, decompress_set
from seqvpr.synthetic import make_synthetic_pair

query, reference = make_synthetic_pair(n_frames=40, seed=2)

# heavy compression on the query side only
q99 = decompress_set(compress_set(query, 99), "query", 256)

m = similarity_matrix(hog_descriptor_set(q99, 99), hog_descriptor_set(reference, 0, role="reference"))
print("similarity matrix", m.shape)

# a single frame can land on a look-alike place
wrong = [i for i in range(len(m)) if best_match_single(m, i) != i]
print("single-frame mistakes at queries:", wrong)

# a sequence drags it back to the true alignment
if wrong:
    i = wrong[0]
    for K in (1, 3, 6):
        if i + K <= len(m):
            r = best_match_sequence(m, i, K)
            print(f"query {i} with K={K}: reference {r.matched_ref_start}, score {r.score:.3f}")

for K in (1, 2, 4, 8):
    print(f"K={K}: accuracy {accuracy(m, K):.3f}")
print("smallest K with every start correct:", minimal_k(m))
