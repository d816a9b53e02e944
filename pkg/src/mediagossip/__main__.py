import sys

from mediagossip.cli import main

sys.exit(main())
