"""Five agents on a line: centralized procedures against swap dynamics."""

# %%
from housemarket import Instance, ark, mrk, is_pareto_optimal, solve, stable_set
from housemarket.central import crawler, ttc
from housemarket.dynamics import reachable_outcomes
from housemarket.oracles import reachable_by_swaps

prefs = (
    (3, 4, 5, 2, 1),
    (3, 4, 5, 2, 1),
    (4, 5, 3, 2, 1),
    (3, 4, 5, 2, 1),
    (1, 2, 3, 4, 5),
)
inst = Instance(prefs, (1, 2, 3, 4, 5), axis=(1, 2, 3, 4, 5))
print("endowment Pareto-optimal?", is_pareto_optimal(inst, inst.endowment))

# %% TTC and Crawler, deal by deal
for name, proc in (("ttc", ttc), ("crawler", crawler)):
    alloc, trace = proc(inst)
    print(f"{name:8s} {alloc}  ark={ark(inst, alloc)} mrk={mrk(inst, alloc)}")
    for deal, after in trace.steps:
        print("   ", deal, "->", after)

# %% both outcomes can also be reached with plain swaps
for name, proc in (("ttc", ttc), ("crawler", crawler)):
    path = reachable_by_swaps(inst, proc(inst)[0])
    print(name, "via swaps:", " ".join(map(str, path)))

# %% what swap dynamics can end in, versus the Pareto-optimal set
ends = reachable_outcomes(inst, k_max=2)
optimal = stable_set(inst, inst.n)
print(len(ends), "reachable end states, all Pareto-optimal:", ends <= optimal)
for alloc in sorted(ends):
    print("   ", alloc, "ark", ark(inst, alloc), "mrk", mrk(inst, alloc))

# %% the ten registered procedures
from housemarket import PROCEDURES

for proc in PROCEDURES:
    alloc, trace = solve(inst, proc, seed=1)
    print(f"{proc:11s} {alloc} ark={ark(inst, alloc):2d} mrk={mrk(inst, alloc)} deals={trace.num_deals}")
