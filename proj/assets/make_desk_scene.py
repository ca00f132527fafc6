# fovtrace is licensed under the Apache License, Version 2.0.
# SPDX: Apache-2.0
"""Writes the bundled desk scene: desk.obj, desk.mtl, sky.hdr and desk.json.

Run from anywhere; outputs land in assets/desk/ next to this script.
"""

import json
import math
import struct
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent / "desk"


class ObjWriter:
    def __init__(self):
        self.lines = ["# desk scene for fovtrace"]
        self.vertex_count = 0
        self.triangles = 0

    def object(self, name, material):
        self.lines.append(f"o {name}")
        self.lines.append(f"usemtl {material}")

    def vertices(self, points):
        base = self.vertex_count
        for p in points:
            self.lines.append("v {:.6f} {:.6f} {:.6f}".format(*p))
        self.vertex_count += len(points)
        return base

    def face(self, *indices):
        self.lines.append("f " + " ".join(str(i + 1) for i in indices))
        self.triangles += len(indices) - 2

    def box(self, name, material, lo, hi):
        self.object(name, material)
        x0, y0, z0 = lo
        x1, y1, z1 = hi
        b = self.vertices([(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
                           (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)])
        for q in [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (3, 7, 6, 2), (0, 4, 7, 3), (1, 2, 6, 5)]:
            self.face(*(b + i for i in q))

    def sphere(self, name, material, center, radius, stacks, slices):
        self.object(name, material)
        cx, cy, cz = center
        pts = []
        for i in range(stacks + 1):
            theta = math.pi * i / stacks
            for j in range(slices):
                phi = 2.0 * math.pi * j / slices
                pts.append((cx + radius * math.sin(theta) * math.cos(phi),
                            cy + radius * math.cos(theta),
                            cz + radius * math.sin(theta) * math.sin(phi)))
        b = self.vertices(pts)
        for i in range(stacks):
            for j in range(slices):
                a = b + i * slices + j
                c = b + i * slices + (j + 1) % slices
                d = b + (i + 1) * slices + (j + 1) % slices
                e = b + (i + 1) * slices + j
                if i == 0:
                    self.face(a, d, e)
                elif i == stacks - 1:
                    self.face(a, c, e)
                else:
                    self.face(a, c, d, e)

    def cylinder(self, name, material, base, radius, height, slices):
        self.object(name, material)
        bx, by, bz = base
        ring = [(bx + radius * math.cos(2 * math.pi * j / slices), bz + radius * math.sin(2 * math.pi * j / slices))
                for j in range(slices)]
        b = self.vertices([(x, by, z) for x, z in ring] + [(x, by + height, z) for x, z in ring])
        for j in range(slices):
            k = (j + 1) % slices
            self.face(b + j, b + slices + j, b + slices + k, b + k)
        self.face(*[b + slices + j for j in reversed(range(slices))])
        self.face(*[b + j for j in range(slices)])

    def grid(self, name, material, size, y, cells):
        self.object(name, material)
        pts = [(-size + 2 * size * i / cells, y, -size + 2 * size * j / cells)
               for j in range(cells + 1) for i in range(cells + 1)]
        b = self.vertices(pts)
        w = cells + 1
        for j in range(cells):
            for i in range(cells):
                a = b + j * w + i
                self.face(a, a + w, a + w + 1, a + 1)


def write_mtl(path):
    materials = {
        "floor": dict(Kd=(0.55, 0.52, 0.48), Pr=0.9, Pm=0.0),
        "wood": dict(Kd=(0.45, 0.28, 0.15), Pr=0.55, Pm=0.0),
        "steel": dict(Kd=(0.85, 0.85, 0.88), Pr=0.3, Pm=1.0),
        "gold": dict(Kd=(1.0, 0.78, 0.34), Pr=0.2, Pm=1.0),
        "plastic_red": dict(Kd=(0.75, 0.12, 0.1), Pr=0.4, Pm=0.0),
        "plastic_blue": dict(Kd=(0.1, 0.25, 0.7), Pr=0.6, Pm=0.0),
        "monitor": dict(Kd=(0.04, 0.04, 0.05), Pr=0.35, Pm=0.0),
        "screen": dict(Kd=(0.02, 0.02, 0.02), Pr=1.0, Pm=0.0, Ke=(0.45, 0.55, 0.7)),
        "paper": dict(Kd=(0.9, 0.9, 0.87), Pr=1.0, Pm=0.0),
        "wall": dict(Kd=(0.7, 0.68, 0.62), Pr=1.0, Pm=0.0),
        "ceramic": dict(Kd=(0.85, 0.82, 0.75), Pr=0.25, Pm=0.0),
    }
    lines = []
    for name, m in materials.items():
        lines.append(f"newmtl {name}")
        lines.append("Kd {:.3f} {:.3f} {:.3f}".format(*m["Kd"]))
        lines.append(f"Pr {m['Pr']}")
        lines.append(f"Pm {m['Pm']}")
        if "Ke" in m:
            lines.append("Ke {:.3f} {:.3f} {:.3f}".format(*m["Ke"]))
        lines.append("")
    path.write_text("\n".join(lines))


def write_obj(path):
    w = ObjWriter()
    w.lines.append("mtllib desk.mtl")
    w.grid("floor", "floor", 6.0, 0.0, 16)
    # Desk top and legs.
    w.box("desk_top", "wood", (-0.8, 0.72, -0.4), (0.8, 0.76, 0.4))
    for i, (x, z) in enumerate([(-0.75, -0.35), (0.75, -0.35), (-0.75, 0.35), (0.75, 0.35)]):
        w.box(f"leg{i}", "wood", (x - 0.03, 0.0, z - 0.03), (x + 0.03, 0.72, z + 0.03))
    # Monitor on a stand.
    w.box("monitor_stand", "steel", (-0.04, 0.76, -0.28), (0.04, 0.95, -0.24))
    w.box("monitor_foot", "steel", (-0.12, 0.76, -0.32), (0.12, 0.775, -0.18))
    w.box("monitor", "monitor", (-0.36, 0.92, -0.29), (0.36, 1.34, -0.25))
    w.box("screen", "screen", (-0.34, 0.94, -0.2502), (0.34, 1.32, -0.249))
    # Desk items.
    w.box("paper", "paper", (-0.55, 0.76, -0.05), (-0.33, 0.763, 0.25))
    w.box("book", "plastic_blue", (0.3, 0.76, -0.1), (0.55, 0.82, 0.12))
    w.cylinder("mug", "ceramic", (0.42, 0.82, 0.02), 0.045, 0.1, 48)
    w.sphere("steel_ball", "steel", (-0.15, 0.84, 0.15), 0.08, 48, 96)
    w.sphere("gold_ball", "gold", (0.12, 0.815, 0.22), 0.055, 32, 64)
    w.sphere("red_ball", "plastic_red", (-0.05, 0.79, 0.3), 0.03, 32, 64)
    w.sphere("floor_ball", "plastic_red", (1.2, 0.25, 0.5), 0.25, 32, 64)
    w.sphere("floor_steel", "steel", (-1.3, 0.35, -0.3), 0.35, 48, 96)
    # Room shell; the sky enters through a skylight above the desk and the open front.
    w.box("back_wall", "wall", (-2.6, 0.0, -1.3), (2.6, 2.8, -1.2))
    w.box("left_wall", "wall", (-2.7, 0.0, -1.3), (-2.6, 2.8, 3.0))
    w.box("right_wall", "wall", (2.6, 0.0, -1.3), (2.7, 2.8, 3.0))
    w.box("ceiling_front", "wall", (-2.7, 2.8, 0.6), (2.7, 2.9, 3.0))
    w.box("ceiling_back", "wall", (-2.7, 2.8, -1.3), (2.7, 2.9, -0.6))
    path.write_text("\n".join(w.lines) + "\n")
    return w.triangles


def sky(width, height):
    """Daylight sky: blue gradient, bright horizon band and a soft sun."""
    img = np.zeros((height, width, 3), dtype=np.float32)
    sun = np.array([math.cos(0.9) * math.cos(0.6), math.sin(0.6), math.sin(0.9) * math.cos(0.6)])
    for y in range(height):
        theta = math.pi * (y + 0.5) / height
        for x in range(width):
            phi = 2 * math.pi * (x + 0.5) / width - math.pi
            d = np.array([math.sin(theta) * math.cos(phi), math.cos(theta), math.sin(theta) * math.sin(phi)])
            up = d[1]
            if up >= 0:
                c = np.array([0.35, 0.55, 0.95]) * (0.6 + 0.4 * up) + np.array([0.6, 0.55, 0.45]) * (1 - up) ** 6
            else:
                c = np.array([0.25, 0.22, 0.2]) * (0.5 + 0.5 * (1 + up))
            c = c + np.array([40.0, 36.0, 30.0]) * max(0.0, float(d @ sun)) ** 400
            img[y, x] = c
    return img


def write_hdr(path, img):
    height, width, _ = img.shape
    out = bytearray(f"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y {height} +X {width}\n".encode())
    for y in range(height):
        for x in range(width):
            r, g, b = (float(v) for v in img[y, x])
            m = max(r, g, b)
            if m < 1e-32:
                out += bytes(4)
                continue
            mant, e = math.frexp(m)
            scale = mant * 256.0 / m
            out += struct.pack("BBBB", int(r * scale), int(g * scale), int(b * scale), e + 128)
    path.write_bytes(bytes(out))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write_mtl(OUT / "desk.mtl")
    triangles = write_obj(OUT / "desk.obj")
    write_hdr(OUT / "sky.hdr", sky(128, 64))
    config = {
        "scene": {"name": "desk", "obj": "desk.obj", "env": "sky.hdr"},
        "camera": {"position": [0.0, 1.25, 1.45], "look_at": [0.0, 0.88, 0.0], "up": [0, 1, 0], "fov_deg": 55.0},
        "image": {"width": 1920, "height": 1080},
        "display": {"width_cm": 70.848, "height_cm": 39.852, "distance_cm": 60.0},
        "foveation": {"tau1": 32, "tau2": 16, "tau3": 8, "n": 2, "m": 4, "ef_deg": 5.2, "ei_deg": 17.0},
        "render": {"spp_uniform": 32, "max_depth": 3, "seed": 0, "mode": "foveated"},
    }
    (OUT / "desk.json").write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {OUT} ({triangles} triangles)")


if __name__ == "__main__":
    main()
