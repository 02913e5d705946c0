"""Searches for the 25-vertex, 36-triangle base mesh of the L-shaped domain.

Interior vertices come in pairs mirrored across the line y = -x, plus a few
on that line, so the mesh is symmetric.  A random walk maximizes the minimum
angle of the Delaunay triangulation.  Prints the vertex and triangle lists
used by lshape_mesh().  Needs numpy and scipy.
"""
import numpy as np
from scipy.spatial import Delaunay

# boundary vertices: corners first, then edge midpoints next to the re-entrant corner
BOUNDARY = np.array([(-1, -1), (0, -1), (0, 0), (1, 0), (1, 1), (-1, 1), (0, 1), (-1, 0),
                     (-0.5, -1), (0, -0.5), (0.5, 0), (1, 0.5)], float)


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def inside(p):
    return -1 < p[0] < 1 and -1 < p[1] < 1 and not (p[0] >= 0 and p[1] <= 0)


def mirror(p):
    return np.array([-p[1], -p[0]])


def vertices(pairs, line):
    pts = list(BOUNDARY)
    for q in pairs:
        pts += [q, mirror(q)]
    pts += [np.array([-t, t]) for t in line]
    return np.array(pts)


def triangles(points):
    return np.array([s for s in Delaunay(points).simplices if inside(points[s].mean(0))])


def angles(points, tri):
    out = []
    for s in tri:
        for i in range(3):
            u = points[s[(i + 1) % 3]] - points[s[i]]
            v = points[s[(i + 2) % 3]] - points[s[i]]
            out.append(np.degrees(np.arccos(u @ v / np.linalg.norm(u) / np.linalg.norm(v))))
    return out


def quality(points):
    if any(not inside(p) for p in points[len(BOUNDARY):]):
        return -1
    tri = triangles(points)
    if len(tri) != 36:
        return -1
    area = sum(0.5 * abs(cross(points[b] - points[a], points[c] - points[a])) for a, b, c in tri)
    if abs(area - 3) > 1e-9:
        return -1
    return min(angles(points, tri))


def search(rng, trials=40, steps=3000):
    best = None
    for _ in range(trials):
        k = rng.choice([1, 3, 5])
        pairs = [np.array([rng.uniform(-1, 0), rng.uniform(-1, 1)]) for _ in range((13 - k) // 2)]
        pairs = [p if inside(p) else np.array([-0.5, 0.5 * rng.uniform(-1, 1)]) for p in pairs]
        line = list(rng.uniform(0.05, 0.95, k))
        q = quality(vertices(pairs, line))
        step = 0.1
        for it in range(steps):
            trial_pairs = [p + rng.normal(0, step, 2) for p in pairs]
            trial_line = [t + rng.normal(0, step) for t in line]
            q2 = quality(vertices(trial_pairs, trial_line))
            if q2 >= q:
                pairs, line, q = trial_pairs, trial_line, q2
            if it % 1000 == 999:
                step /= 2
        if best is None or q > best[0]:
            best = (q, pairs, line)
    return vertices(best[1], best[2])


def main():
    points = np.round(search(np.random.default_rng(1)), 3)
    out = []
    for s in triangles(points):
        a, b, c = points[s]
        if cross(b - a, c - a) < 0:
            s = [s[0], s[2], s[1]]
        out.append([int(i) for i in s])
    out.sort()
    ang = angles(points, out)
    print(f"min angle {min(ang):.2f}, max angle {max(ang):.2f}")
    print("vertices", ", ".join(f"{{{p[0]:g}, {p[1]:g}}}" for p in points))
    print("triangles", ", ".join("{%d, %d, %d}" % tuple(s) for s in out))


if __name__ == "__main__":
    main()
