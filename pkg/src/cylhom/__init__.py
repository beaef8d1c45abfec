"""cylhom: Conley-Zehnder gradings, building enumeration and cylindrical contact homology from Reeb orbit data."""

__version__ = "0.1.0"
