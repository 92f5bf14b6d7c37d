from typing import Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr


class SVG(object):
    """Minimal SVG document builder, elements are appended as text."""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self._parts = []

    @staticmethod
    def _attrs(attrs: dict) -> str:
        return ''.join(' %s=%s' % (k.rstrip('_').replace('_', '-'), quoteattr(str(v))) for k, v in attrs.items()
                       if v is not None)

    def group_start(self, **attrs):
        self._parts.append('<g%s>' % self._attrs(attrs))

    def group_end(self):
        self._parts.append('</g>')

    def rect(self, x: float, y: float, width: float, height: float, **attrs):
        self._parts.append('<rect x="%.2f" y="%.2f" width="%.2f" height="%.2f"%s/>' %
                           (x, y, width, height, self._attrs(attrs)))

    def line(self, x1: float, y1: float, x2: float, y2: float, **attrs):
        self._parts.append('<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f"%s/>' % (x1, y1, x2, y2,
                                                                               self._attrs(attrs)))

    def polyline(self, points: Sequence[Tuple[float, float]], **attrs):
        pts = ' '.join('%.2f,%.2f' % p for p in points)
        self._parts.append('<polyline points="%s" fill="none"%s/>' % (pts, self._attrs(attrs)))

    def circle(self, cx: float, cy: float, r: float, **attrs):
        self._parts.append('<circle cx="%.2f" cy="%.2f" r="%.2f"%s/>' % (cx, cy, r, self._attrs(attrs)))

    def text(self, x: float, y: float, string: str, **attrs):
        self._parts.append('<text x="%.2f" y="%.2f"%s>%s</text>' % (x, y, self._attrs(attrs), escape(string)))

    def to_string(self) -> str:
        head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
                '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%d" height="%d" '
                'viewBox="0 0 %d %d">' % (self.width, self.height, self.width, self.height))
        return '\n'.join([head] + self._parts + ['</svg>']) + '\n'

    def save(self, filename: str):
        with open(filename, 'w') as f:
            f.write(self.to_string())


__all__ = ['SVG']
