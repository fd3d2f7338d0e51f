from .server import serve

if __name__ == "__main__":
    raise SystemExit(serve())
