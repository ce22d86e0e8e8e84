"""Stage 5: faithfulness screening of inverse pairs in enlarged indexing."""
import numpy as np

rng = np.random.default_rng(47)

def pos(x): return x if x > 0 else 0
def neg(x): return x if x < 0 else 0
F = {"p": pos, "n": neg}

def make_rule(v):
    (ca, fa, cb, fb,
     b1s, b1f, b1t,
     b2s, b2f, b2t,
     a1s1, a1f1, a1s2, a1f2, a1is, a1if, a1tc, a1x,
     a2s1, a2f1, a2s2, a2f2, a2is, a2if, a2tc, a2x) = v
    def rule(a1, b1, a2, b2):
        c = a1 - a2 + ca * F[fa](b1) + cb * F[fb](b2)
        nb1 = b2 + b1s * F[b1f](b1t * c)
        nb2 = b1 + b2s * F[b2f](b2t * c)
        i1 = b2 if a1x == 2 else b1
        i2 = b1 if a2x == 1 else b2
        na1 = a1 + a1s1 * F[a1f1](b1) + a1s2 * F[a1f2](a1is * F[a1if](i1) + a1tc * c)
        na2 = a2 + a2s1 * F[a2f1](b2) + a2s2 * F[a2f2](a2is * F[a2if](i2) + a2tc * c)
        return na1, nb1, na2, nb2
    return rule

# enlarged indexing: m strands -> pairs 1..m; letter ±i touches pairs (i, i+1)
def apply_word(posrule, invrule, coords, word, m):
    a = list(coords[0::2])  # length m
    b = list(coords[1::2])
    for s in word:
        i = abs(s) - 1  # 0-based pair index: touches pairs i, i+1
        r = posrule if s > 0 else invrule
        a[i], b[i], a[i + 1], b[i + 1] = r(a[i], b[i], a[i + 1], b[i + 1])
    out = []
    for j in range(m):
        out.extend((a[j], b[j]))
    return tuple(out)

def free_reduce(word):
    out = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)

def artin_apply(images, s, m):
    i = abs(s)
    new = list(images)
    for j in range(m):
        w = []
        for g in images[j]:
            aa = abs(g)
            if s > 0:
                rep = (i, i + 1, -i) if aa == i else ((i,) if aa == i + 1 else (aa,))
            else:
                rep = (i + 1,) if aa == i else ((-(i + 1), i, i + 1) if aa == i + 1 else (aa,))
            if g < 0:
                rep = tuple(-x for x in reversed(rep))
            w.extend(rep)
        new[j] = free_reduce(w)
    return new

def artin_trivial(word, m):
    images = [(j + 1,) for j in range(m)]
    for s in word:
        images = artin_apply(images, s, m)
    return all(images[j] == (j + 1,) for j in range(m))

def delta2(m):
    d = []
    for k in range(1, m):
        d.extend(range(k, 0, -1))
    return d * 2

pairs = list(np.load("/tmp/rule_pairs.npy", allow_pickle=True))
if len(pairs) == 0:
    # rebuild from survivors + quad-inverse check
    survivors = [tuple(v) for v in np.load("/tmp/rule_survivors.npy", allow_pickle=True)]
    rules = [make_rule(v) for v in survivors]
    quads = [tuple(int(x) for x in rng.integers(-9, 10, 4)) for _ in range(60)]
    pairs = []
    for i, r1 in enumerate(rules):
        for j, r2 in enumerate(rules):
            if all(r2(*r1(*q)) == q for q in quads) and all(r1(*r2(*q)) == q for q in quads):
                pairs.append((survivors[i], survivors[j]))
print("candidate pairs:", len(pairs))

def vecs_for(m, k=20):
    return [tuple(int(x) for x in rng.integers(-9, 10, 2 * m)) for _ in range(k)]

def trivial_action(pr, ir, word, m, vecs):
    return all(apply_word(pr, ir, L, word, m) == L for L in vecs)

winners = []
for (vp, vi) in pairs:
    pr, ir = make_rule(tuple(vp)), make_rule(tuple(vi))
    ok = True
    # relations incl. former-boundary generators, enlarged indexing
    for m in (3, 4, 5):
        vecs = vecs_for(m, 10)
        for g in range(1, m - 1):
            for L in vecs:
                if apply_word(pr, ir, L, [g, g + 1, g], m) != apply_word(pr, ir, L, [g + 1, g, g + 1], m):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            break
    if not ok:
        continue
    # faithfulness vs artin on random + crafted words
    mism = 0
    for t in range(120):
        m = int(rng.integers(3, 5))
        L = int(rng.integers(1, 11))
        w = [int(g) for g in rng.integers(1, m, L) * rng.choice([-1, 1], size=L)]
        # crafted variants
        wv = list(w)
        kind = t % 4
        if kind == 0:
            ins = int(rng.integers(0, len(wv) + 1)); g = int(rng.integers(1, m))
            w2 = wv[:ins] + [g, -g] + wv[ins:]          # equal
        elif kind == 1:
            w2 = wv + [int(rng.integers(1, m))]          # unequal (prob.)
        elif kind == 2:
            w2 = wv + delta2(m)                           # unequal strictly
        else:
            w2 = delta2(m) + wv                           # w*d2 vs d2*w equal
            wv = wv + delta2(m)
        word = list(wv) + [-g for g in reversed(w2)]
        lam_triv = trivial_action(pr, ir, word, m, vecs_for(m, 14))
        art_triv = artin_trivial(word, m)
        if lam_triv != art_triv:
            mism += 1
            break
    if mism == 0:
        winners.append((tuple(vp), tuple(vi)))

print("faithful winners:", len(winners))
np.save("/tmp/rule_winners.npy", np.array(winners, dtype=object), allow_pickle=True)
for w in winners[:6]:
    print("POS:", w[0])
    print("INV:", w[1])
    print()
