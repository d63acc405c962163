"""Regenerate hydrogen_z.csv from the NIST standardized hydrogen density
correlation (Lemmon, Huber, Leachman 2008, J. Res. NIST 113, 341-350).

    Z = 1 + sum_i a_i * (100 K / T)^b_i * (p / 1 MPa)^c_i

Valid 200-1000 K up to 200 MPa, within 0.01 % of the reference EOS.
"""
A = [0.05888460, -0.06136111, -0.002650473, 0.002731125, 0.001802374,
     -0.001150707, 0.9588528e-4, -0.1109040e-6, 0.1264403e-9]
B = [1.325, 1.87, 2.5, 2.8, 2.938, 3.14, 3.37, 3.75, 4.0]
C = [1.0, 1.0, 2.0, 2.0, 2.42, 2.63, 3.0, 4.0, 5.0]


def z(p_mpa, t_k):
    return 1.0 + sum(a * (100.0 / t_k) ** b * p_mpa ** c for a, b, c in zip(A, B, C))


pressures = [0.0, 0.1, 0.5] + [float(p) for p in range(1, 61)]
temps = list(range(270, 371, 5))
print("p_MPa," + ",".join(str(t) for t in temps))
for p in pressures:
    print(f"{p:g}," + ",".join(f"{z(p, t):.6f}" for t in temps))
