# Forward-solver oracles in 30-digit arithmetic.
#  * Duhamel coefficients int_0^t lam(t-s) s^{a-1} E_{a,a}(l s^a) ds by tanh-sinh
#    quadrature (handles the s^{a-1} endpoint); zeros refined here with findroot.
#  * Fractional stiffness S_ij = -int (I^{2-b} phi_j')(x) phi_i'(x) dx as a brute-force
#    double integral.
from mpmath import mp, mpf, mpc, rgamma, findroot, quad, exp, sin, gamma
mp.dps = 30

def ml(a, b, z):
    s = mpc(0); k = 0
    while True:
        t = z**k * rgamma(a * k + b)
        s += t
        if k > 10 and abs(t) < mpf(10)**-32 * max(abs(s), 1):
            return s
        k += 1

a = mpf('1.5')
lams = [findroot(lambda z: ml(a, a, z), mpf('-5.07')),
        findroot(lambda z: ml(a, a, z), mpc('-99.72', '21.30'))]
print("// generated by tests/oracles/gen_forward.py")
print("/// (alpha, lambda_n, t, intensity tag, value); tags: 0 = 2e^t, 1 = 5 sin t, 2 = 1")
print("pub const DUHAMEL: &[(f64, (f64, f64), f64, u8, (f64, f64))] = &[")
ints = [lambda t: 2 * exp(t), lambda t: 5 * sin(t), lambda t: mpf(1)]
for l in lams:
    for t in [mpf('0.3'), mpf(1)]:
        for tag in [0, 1, 2]:
            lam = ints[tag]
            v = quad(lambda s: lam(t - s) * s**(a - 1) * ml(a, a, l * s**a), [0, t / 4, t])
            print(f"    (1.5, ({float(mpc(l).real)!r}, {float(mpc(l).imag)!r}), {float(t)!r}, {tag}, ({float(mpc(v).real)!r}, {float(mpc(v).imag)!r})),")
print("];")

mp.dps = 20

def stiffness(b, nodes, i, j):
    # hats phi_i, phi_j at interior node indices i, j (1-based)
    def dphi(k, x):
        if nodes[k - 1] < x < nodes[k]:
            return 1 / (nodes[k] - nodes[k - 1])
        if nodes[k] < x < nodes[k + 1]:
            return -1 / (nodes[k + 1] - nodes[k])
        return mpf(0)
    def frac(x):
        pts = [p for p in nodes if p < x] + [x]
        return rgamma(2 - b) * quad(lambda s: (x - s)**(1 - b) * dphi(j, s) if s < x else mpf(0), pts)
    return -quad(lambda x: frac(x) * dphi(i, x), [nodes[i - 1], nodes[i], nodes[i + 1]])

print("/// (beta, nodes, i, j, S_ij) with 1-based interior indices")
print("pub const STIFFNESS: &[(f64, &[f64], usize, usize, f64)] = &[")
uni = [mpf(k) / 4 for k in range(5)]
gr = [(mpf(k) / 4)**2 for k in range(5)]
for b, nodes in [(mpf('1.5'), uni), (mpf('1.5'), gr), (mpf('1.3'), uni)]:
    for (i, j) in [(1, 1), (1, 2), (2, 1), (3, 1), (1, 3)]:
        v = stiffness(b, nodes, i, j)
        print(f"    ({float(b)!r}, &[{', '.join(repr(float(p)) for p in nodes)}], {i}, {j}, {float(v)!r}),")
print("];")
