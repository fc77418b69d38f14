from stlsq.cli import main
import sys
sys.exit(main())
