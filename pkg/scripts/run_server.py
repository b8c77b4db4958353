#!/usr/bin/env python3
"""Start the demo server: python3 scripts/run_server.py [--config PATH] [--bind HOST:PORT]"""

import argparse
import sys

from pathtrace.demo import demo_config_path
from pathtrace.server import serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(demo_config_path()),
                        help="app.json to serve (default: bundled demo app)")
    parser.add_argument("--bind", default=None, help="host:port override")
    parser.add_argument("--no-prov", action="store_true",
                        help="serve without instrumentation")
    args = parser.parse_args(argv)
    server = serve(args.config, bind=args.bind, force_off=args.no_prov)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}/pages/form.xhtml "
          f"(profile={server.profile}, prov={'off' if args.no_prov else 'config'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("\nshutting down")
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
