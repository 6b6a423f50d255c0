import math


class Circle:
    """A circle described by its radius.

    Args:
        radius (float): distance from the centre to the edge
    """

    def __init__(self, radius):
        self.radius = radius

    def area(self):
        """Compute the area enclosed by the circle.

        Returns:
            float: the area in square units
        """
        # square the radius first
        r2 = self.radius * self.radius
        # then scale by pi
        return math.pi * r2


def scale_all(shapes, factor):
    """Scale every shape in the list by the same factor.

    :param shapes: the shapes to resize
    :param factor: multiplier applied to each radius
    :returns: the list of scaled shapes
    """
    out = []
    for s in shapes:
        # build a scaled copy of each circle
        out.append(Circle(s.radius * factor))
    return out


def make_registry():
    """Create a registry object that remembers named shapes."""

    class Registry:
        """Mapping from shape names to shape objects."""

        def register(self, name, shape):
            """Store a shape under the given name and return it."""
            self.items = getattr(self, "items", {})
            self.items[name] = shape
            return shape

    return Registry()


def perimeter(c):
    return 2 * math.pi * c.radius
