"""Scratch validation of the lamination update formulas (not shipped)."""
import itertools
import numpy as np
from equicritical.braids import ColoredBraidWord, LaminationCoords, act, ROOT, braids_equal

rng = np.random.default_rng(42)


def W(m, letters):
    return ColoredBraidWord(m, tuple(letters), (ROOT,) * m)


def rand_lam(m):
    return LaminationCoords(tuple(int(x) for x in rng.integers(-10, 11, 2 * m)))


def check(name, m, w1, w2, trials=300):
    bad = 0
    for _ in range(trials):
        L = rand_lam(m)
        if act(W(m, w1), L) != act(W(m, w2), L):
            bad += 1
    print(f"{name} (m={m}): {'OK' if bad == 0 else f'FAIL {bad}/{trials}'}")
    return bad == 0


ok = True
for m in (3, 4, 5, 6):
    for i in range(1, m):
        ok &= check(f"sigma_{i} sigma_{i}^-1", m, [i, -i], [])
        ok &= check(f"sigma_{i}^-1 sigma_{i}", m, [-i, i], [])
    for i in range(1, m - 1):
        ok &= check(f"braid rel {i}", m, [i, i + 1, i], [i + 1, i, i + 1])
    for i in range(1, m):
        for j in range(i + 2, m):
            ok &= check(f"commute {i},{j}", m, [i, j], [j, i])

# Artin free-group oracle -----------------------------------------------------

def free_reduce(word):
    out = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def artin_apply_letter(images, s, m):
    """images[j] = word in free generators 1..m for the image of x_j."""
    i = abs(s)
    new = list(images)
    if s > 0:
        # x_i -> x_i x_{i+1} x_i^{-1}, x_{i+1} -> x_i
        for j in range(m):
            w = []
            for g in images[j]:
                a = abs(g)
                if a == i:
                    rep = (i, i + 1, -i)
                elif a == i + 1:
                    rep = (i,)
                else:
                    rep = (a,)
                if g < 0:
                    rep = tuple(-x for x in reversed(rep))
                w.extend(rep)
            new[j] = free_reduce(w)
    else:
        # x_i -> x_{i+1}, x_{i+1} -> x_{i+1}^{-1} x_i x_{i+1}
        for j in range(m):
            w = []
            for g in images[j]:
                a = abs(g)
                if a == i:
                    rep = (i + 1,)
                elif a == i + 1:
                    rep = (-(i + 1), i, i + 1)
                else:
                    rep = (a,)
                if g < 0:
                    rep = tuple(-x for x in reversed(rep))
                w.extend(rep)
            new[j] = free_reduce(w)
    return new


def artin_images(word, m):
    images = [(j + 1,) for j in range(m)]
    for s in word:
        images = artin_apply_letter(images, s, m)
    return tuple(map(tuple, images))


def artin_trivial(word, m):
    return artin_images(word, m) == tuple((j + 1,) for j in range(m))


# faithfulness cross-check
mism = 0
trials = 500
for t in range(trials):
    m = int(rng.integers(3, 5))
    L1 = int(rng.integers(0, 13))
    L2 = int(rng.integers(0, 13))
    w1 = [int(g) for g in rng.integers(1, m) * rng.choice([-1, 1], size=L1)]
    w2 = [int(g) for g in rng.integers(1, m) * rng.choice([-1, 1], size=L2)]
    b1 = W(m, w1)
    b2 = W(m, w2)
    lam_eq = braids_equal(b1, b2, mod_center=False)
    art_eq = artin_trivial(list(w1) + [-g for g in reversed(w2)], m)
    if lam_eq != art_eq:
        mism += 1
        if mism < 5:
            print("MISMATCH", m, w1, w2, "lam:", lam_eq, "artin:", art_eq)
print(f"faithfulness: {trials - mism}/{trials} agree")
print("ALL OK" if ok and mism == 0 else "PROBLEMS FOUND")
