"""Independent high-precision oracle for the frozen constants in the unit tests.

Run with: python3 derive_constants.py
Uses mpmath only; no code is shared with the C++ library.
"""
import mpmath as mp

mp.mp.dps = 60


def gauss_legendre(n):
    xs, ws = [], []
    for i in range(1, n + 1):
        x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
        for _ in range(100):
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mp.mpf(10) ** (-mp.mp.dps + 5):
                break
        p0, p1 = mp.mpf(1), x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    return xs[::-1], ws[::-1]


def operator(h, n):
    xs, ws = gauss_legendre(n)
    t = [x + 1j * h for x in xs]
    a = mp.matrix(n, n)
    for j in range(n):
        for k in range(n):
            a[j, k] = mp.sqrt(ws[j]) * 1j / (2 * mp.pi * (t[j] - mp.conj(t[k]))) * mp.sqrt(ws[k])
    return xs, ws, t, a


def modulus_root(h):
    def f(m):
        K, E = mp.ellipk(m), mp.ellipe(m)
        phi = mp.asin(mp.sqrt((K - E) / (m * K)))
        return K * mp.ellipe(phi, m) - E * mp.ellipf(phi, m) - mp.pi / (2 * h)
    return mp.findroot(f, (mp.mpf('0.5'), 1 - mp.mpf('1e-12')), solver='anderson')


def show(name, v):
    print(f"{name} = {mp.nstr(v, 36)}")


show("K(1/2)", mp.ellipk(mp.mpf(1) / 2))
show("E(1/2)", mp.ellipe(mp.mpf(1) / 2))
for h in [mp.mpf(1), mp.mpf('0.5')]:
    m = modulus_root(h)
    tau = mp.ellipk(1 - m) / mp.ellipk(m)
    a = mp.pi / (2 * h)
    W = mp.pi * mp.ellipk(mp.sech(a) ** 2) / mp.ellipk(mp.tanh(a) ** 2)
    show(f"h={h} m_param", m)
    show(f"h={h} ln_rho", 2 * mp.pi * tau)
    show(f"h={h} widom_W", W)
show("rho1(h=1)", 3 - 2 * mp.sqrt(2))

# Continuation solve at z = 2+i, eps = 1e-8, Gamma = [-1,1]+i, N = 80.
h, n = mp.mpf(1), 80
xs, ws, t, a = operator(h, n)
z = mp.mpc(2, 1)
eps2 = mp.mpf('1e-8') ** 2
p = mp.matrix([mp.sqrt(ws[j]) * 1j / (t[j] - mp.conj(z)) for j in range(n)])
m = a + eps2 * mp.eye(n)
x = mp.lu_solve(m, p)
up = sum(mp.conj(x[j]) * p[j] for j in range(n))
uz = (mp.pi / z.imag - up) / (2 * mp.pi * eps2)
l2 = mp.sqrt(sum(abs(x[j]) ** 2 for j in range(n)))
show("u(z) re (z=2+i, eps=1e-8, N=80)", uz.real)
show("u(z) im", uz.imag)
show("norm_L2_Gamma", l2)

# Eigenvalues at N = 80.
ev = sorted(mp.eighe(a, eigvals_only=True), reverse=True)
for k in [1, 2, 5, 10, 20]:
    show(f"lambda_{k}", ev[k - 1])
print("count lambda >= 1e-30:", sum(1 for v in ev if v >= mp.mpf('1e-30')))
show("lambda_min", ev[-1])
