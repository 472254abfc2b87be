from brac_witness.cli import main

raise SystemExit(main())
