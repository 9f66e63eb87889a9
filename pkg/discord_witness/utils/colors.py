import sys


class Colors:
    GREEN = '\033[92m'
    RED = '\033[91m'
    YELLOW = '\033[93m'
    BOLD = '\033[1m'
    ENDC = '\033[0m'

    CHECK = '✅'
    CROSS = '❌'

    @classmethod
    def disable_colors(cls):
        for attr in ("GREEN", "RED", "YELLOW", "BOLD", "ENDC"):
            setattr(cls, attr, '')

    @staticmethod
    def supports_color(stream=None):
        stream = sys.stdout if stream is None else stream
        return hasattr(stream, 'isatty') and stream.isatty()


def status_line(name: str, passed: bool, detail: str) -> str:
    """One report line, e.g. '✅ bell-value  residual=0.000e+00 tol=1.0e-09'."""
    mark, color = (Colors.CHECK, Colors.GREEN) if passed else (Colors.CROSS, Colors.RED)
    return f"{mark} {color}{name:<22}{Colors.ENDC} {detail}"


if not Colors.supports_color():
    Colors.disable_colors()
