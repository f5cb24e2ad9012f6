try:
    from vastzones._vastzones import *  # noqa: F401,F403
except ImportError:
    from _vastzones import *  # noqa: F401,F403
