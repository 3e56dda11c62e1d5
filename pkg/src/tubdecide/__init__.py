"""Decision tools for the common theory of modules over canonical tubular algebras."""

__version__ = "0.1.0"
