#!/usr/bin/env python3
"""Write a genus-2 quad complex: two 3x3 tori with one face each removed,
glued along the boundary squares with reversed orientation."""
import sys


def torus(n):
    vid = lambda i, j: (i % n) + n * (j % n)
    edges = [(vid(i, j), vid(i + 1, j)) for j in range(n) for i in range(n)]
    edges += [(vid(i, j), vid(i, j + 1)) for j in range(n) for i in range(n)]
    h = lambda i, j: vid(i, j)
    v = lambda i, j: n * n + vid(i, j)
    faces = [(h(i, j), v(i + 1, j), h(i, j + 1), v(i, j)) for j in range(n) for i in range(n)]
    return n * n, edges, faces


def main(out):
    nv, edges, faces = torus(3)
    # Removed face 0 has corners (0, 1, 4, 3) and sides h(0,0), v(1,0), h(0,1), v(0,0).
    hole = faces[0]
    corners = [0, 1, 4, 3]
    vmap = {}
    nxt = nv
    for x in range(nv):
        if x in corners:
            k = corners.index(x)
            vmap[x] = corners[(-k) % 4]  # reflect the walk
        else:
            vmap[x] = nxt
            nxt += 1
    side_map = {hole[0]: hole[3], hole[1]: hole[2], hole[2]: hole[1], hole[3]: hole[0]}
    all_edges = list(edges)
    emap = {}
    for e, (a, b) in enumerate(edges):
        if e in side_map:
            emap[e] = side_map[e]
        else:
            emap[e] = len(all_edges)
            all_edges.append((vmap[a], vmap[b]))
    all_faces = faces[1:] + [tuple(emap[e] for e in f) for f in faces[1:]]
    with open(out, "w") as fh:
        fh.write("# genus-2 surface: connected sum of two 3x3 tori\n")
        fh.write(f"{nxt} {len(all_edges)} {len(all_faces)}\n")
        for a, b in all_edges:
            fh.write(f"{a} {b}\n")
        for f in all_faces:
            fh.write(" ".join(map(str, f)) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "genus2.quad")
