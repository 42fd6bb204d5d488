"""
The compression / sequence-length trade-off
===========================================

Sweep query and map compression levels. For each pair find the smallest
sequence length K that localises every query start, then turn it into data
transferred (i_s * K) and time (t_m + t_e * K + t_c * K).
"""

from seqvpr import TimingProfile, run_sweep
from seqvpr.synthetic import make_synthetic_pair

query, reference = make_synthetic_pair(n_frames=50, seed=0)

# fixed per-image timings keep the numbers reproducible; omit them to measure
profile = TimingProfile(t_e=0.005, t_m=0.05, t_c=0.001)
report = run_sweep(query, reference, "hog", [0, 50, 90, 99], [0, 50, 90, 99], profile)

print(f"{'q':>3} {'map':>4} {'K*':>4} {'i_s KB':>8} {'d KB':>9} {'t_total s':>10}")
for p in report.points:
    if p.k_star is None:
        print(f"{p.q_level:3d} {p.map_level:4d}  none")
        continue
    print(f"{p.q_level:3d} {p.map_level:4d} {p.k_star:4d} {p.i_s_kb:8.2f} {p.d_kb:9.2f} {p.t_total:10.4f}")

# uniform pairs are the diagonal of the grid
uniform = [p for p in report.points if p.uniform and p.k_star]
best = min(uniform, key=lambda p: p.d_kb)
print(f"least data per localisation: level {best.q_level}, K={best.k_star}, {best.d_kb:.1f} KB")

# the same report as it would be written by `seqvpr sweep`
print(report.to_csv(timing=False))
