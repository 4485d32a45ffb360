"""binviz: executable-to-image conversion and evaluation toolkit."""

__version__ = "0.1.0"

IMAGE_SIDE = 224
BUFFER_LEN = IMAGE_SIDE * IMAGE_SIDE  # 50,176 bytes per sample
