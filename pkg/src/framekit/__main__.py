from framekit.cli import main

raise SystemExit(main())
