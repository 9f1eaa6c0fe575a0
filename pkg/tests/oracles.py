"""Reference values computed independently with mpmath at 30 digits.

Roots come from mpmath.findroot on the closed-form stationarity equations;
distances from mpmath.quad of the squared difference between the mixture
density and the normal density; see the inline notes.
"""

import math

# root of 1/2 (1+t)^-3/2 + 1/2 (2+t)^-3/2 = (2t)^-3/2
T0_EXAMPLE1 = 1.39277262355208136790883151012
# integral over R of (f - phi_t0)^2, two-atom mixture
DIST_EXAMPLE1 = 9.56942138135476528599601483746e-05
# F(y) = (2/y)(1 - (1+y)^-1/2) for the uniform law on (0, 1)
T0_UNIFORM = 0.366777018722988130099312747083
DIST_UNIFORM = 0.00728365092140820562437650943992
# exponential law with mean 1; its mixture is the Laplace density with a = sqrt 2
T0_EXPONENTIAL = 0.524920449130048627576964609502
DIST_EXPONENTIAL = 0.0125146145179586344593294467161
# E[(0.524 + V)^-3/2], V standard exponential
RESOLVENT_EXP_0524 = 0.931206955843260751079670462574
# roots of 1/2 (1+t)^-q + 1/2 (2+t)^-q = (2t)^-q for q = 2 and q = 5/2
TAU_EXAMPLE1_N2 = 1.37166964822981666651076065022
TAU_EXAMPLE1_N3 = 1.35106923982761065473803083715
# distance at tau I_2 by radial quadrature of the 2-D squared difference
DIST_EXAMPLE1_N2 = 7.21096243348248588873189289624e-05
# sum over Z of (-1)^n exp(-n^2 / 2)
KS_CDF_1 = 0.0360547563351249056140861037179
PAIR_UNIFORM = 1.10456949966158679680450326456
PAIR_EXAMPLE1 = 0.590451829891449758713761752915
NORM2_EXAMPLE1 = 0.235556199484093778514584148224
# E[(V + V1)^-1/2] for the inverse gamma law with shape 1/4, rate 1/2
PAIR_IG_QUARTER = 0.182295311063516389788336645525
# integrals of f^2 for the logistic, Laplace (a = 1) and Cauchy densities
L2_LOGISTIC = 1.0 / 6.0
L2_LAPLACE_1 = 0.25
L2_CAUCHY = 1.0 / (2.0 * math.pi)
