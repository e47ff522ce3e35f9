import os
# symbolic scalar curvature of the radial potential s + eps s^2 / (1 + s), frozen to CSV
import sympy as sp
z1,z2,w1,w2=sp.symbols('z1 z2 w1 w2')
eps=sp.Rational(1,10)
s=z1*w1+z2*w2
K=s+eps*s**2/(1+s)   # phi = eps s^2/(1+s)
zs=[z1,z2]; ws=[w1,w2]
g=sp.Matrix(2,2,lambda j,k: sp.diff(K,zs[j],ws[k]))
L=sp.log(g.det())
R=sp.Matrix(2,2,lambda j,k: -sp.diff(L,zs[j],ws[k]))
ginv=g.inv()
S=4*sum(ginv[k,j]*R[j,k] for j in range(2) for k in range(2))
out=[]
for rv in ['0.1','0.5','1','2','5','10']:
    r=sp.Rational(rv)
    sub={z1:r,w1:r,z2:0,w2:0}
    out.append((rv,sp.N(S.subs(sub),30),sp.N(g[0,0].subs(sub),30),sp.N(g[1,1].subs(sub),30)))
with open(os.path.join(os.path.dirname(__file__), 'scalar_phi_eps_s2_over_1ps.csv'),'w') as f:
    f.write('r,S,g11,g22\n')
    for rv,v,a,b in out: f.write(f'{rv},{sp.N(v,20)},{sp.N(a,20)},{sp.N(b,20)}\n')
