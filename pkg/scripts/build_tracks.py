"""Regenerate the bundled track files under src/symnav/tracks/."""

from pathlib import Path

from symnav.track import corridor_track, save_track

OUT = Path(__file__).resolve().parents[1] / "src" / "symnav" / "tracks"


def slalom(n, depth, width, x0, gap, thick=30.0, y=0.0, first=1):
    return [(x0 + i * gap, y + (first if i % 2 == 0 else -first) * (width / 2 - depth / 2), thick, depth)
            for i in range(n)]


MAPS = {
    "map1": dict(
        path=[(0, 0), (700, 0), (700, 500), (1300, 500)], width=100,
        obstacles=[(300, -27, 30, 46), (500, 27, 30, 46), (675, 250, 50, 30), (1000, 475, 30, 50)],
    ),
    "map2": dict(
        path=[(0, 0), (500, 0), (500, 400), (1000, 400), (1000, 0), (1400, 0)], width=90,
        obstacles=[],
    ),
    "map3": dict(
        path=[(0, 0), (800, 0), (800, 400), (100, 400)], width=100,
        obstacles=[(400, 25, 30, 50), (825, 200, 50, 30), (450, 375, 30, 50)],
    ),
    "map4": dict(
        path=[(0, 0), (500, 0), (500, -400), (1000, -400), (1000, 0), (1500, 0)], width=90,
        obstacles=[(250, -25, 30, 40), (475, -200, 40, 30), (750, -375, 30, 40), (1025, -200, 40, 30)],
    ),
    "map5": dict(
        path=[(0, 0), (1600, 0)], width=100,
        obstacles=slalom(6, 40, 100, 300, 200),
    ),
    "map6": dict(
        path=[(0, 0), (1500, 0), (1500, 700)], width=100,
        obstacles=slalom(6, 50, 100, 300, 200) + [(1525, 350, 50, 30)],
    ),
    "map7": dict(
        path=[(0, 0), (900, 0), (900, 700), (0, 700), (0, 300), (500, 300)], width=100,
        obstacles=[(450, -25, 30, 50), (875, 350, 50, 30), (450, 725, 30, 50), (25, 500, 50, 30)],
    ),
    "map8": dict(
        path=[(0, 0), (400, 0), (400, 300), (800, 300), (800, 600), (1200, 600), (1200, 900)], width=90,
        obstacles=[(200, 22, 30, 45), (422, 150, 45, 30), (600, 278, 30, 45), (778, 450, 45, 30),
                   (1000, 622, 30, 45)],
    ),
    "map9": dict(
        path=[(0, 0), (600, 0), (600, 500), (1200, 500), (1200, -100), (1700, -100)], width=100,
        obstacles=slalom(2, 45, 100, 250, 200) + [(575, 250, 50, 30), (900, 525, 30, 50),
                                                 (1225, 200, 50, 30), (1450, -75, 30, 50)],
    ),
    "map10": dict(
        path=[(0, 0), (600, 0), (600, 400), (1100, 400), (1100, 800)], width=75,
        obstacles=[(300, 20, 30, 35), (620, 200, 35, 30), (850, 380, 30, 35)],
    ),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, m in MAPS.items():
        track = corridor_track(name, m["path"], float(m["width"]), m["obstacles"])
        save_track(track, OUT / f"{name}.json")
        print(name, len(track.walls), "walls", len(track.obstacles), "obstacles")


if __name__ == "__main__":
    main()
