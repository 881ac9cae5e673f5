import sys

from dotenv import load_dotenv

from app.cli.main import main

load_dotenv()
sys.exit(main())
