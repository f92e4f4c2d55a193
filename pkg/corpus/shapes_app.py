import geometry
import textutil


def report(r):
    area = geometry.circle_area(r)
    label = textutil.shout("area")
    print(label, geometry.round_to(area, 3))
    return area


if __name__ == "__main__":
    report(2)
    geometry.wave(5)
    print(textutil.join_words(["a", "b", "c"], "-"))
    report(1.5)
