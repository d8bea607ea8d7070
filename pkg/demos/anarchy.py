"""Price-of-anarchy families: good and bad outcomes both reached by improving swaps."""

# %%
from fractions import Fraction

from housemarket import ark, mrk, is_stable
from housemarket.oracles import (empirical_poa, poa_ark_instance, poa_ark_sequences, poa_mrk_instance,
                                 poa_mrk_sequences, replay)

# %% utilitarian family
for n in (4, 6, 10, 20):
    inst, worst, best = poa_ark_instance(n)
    to_worst, to_best = poa_ark_sequences(n)
    print(f"n={n:2d} ark best={ark(inst, best)} worst={ark(inst, worst)} "
          f"ratio={Fraction(ark(inst, best), ark(inst, worst))} "
          f"replays ok={replay(inst, to_worst)[1] and replay(inst, to_best)[1]} "
          f"worst swap-stable={is_stable(inst, worst, 2)}")

# the worst outcome above still admits a swap; the exact stable worst on small n
for n in (4, 5, 6):
    inst = poa_ark_instance(n).instance
    print(f"n={n} exhaustive ark PoA over IR stable outcomes: {empirical_poa(inst, 'ark')}")

# %% egalitarian family
for n in (4, 6, 10, 20):
    inst, worst, best = poa_mrk_instance(n)
    seqs = poa_mrk_sequences(n)
    print(f"n={n:2d} mrk best={mrk(inst, best)} worst={mrk(inst, worst)} "
          f"replays ok={all(replay(inst, s)[1] for s in seqs)} worst swap-stable={is_stable(inst, worst, 2)}")
