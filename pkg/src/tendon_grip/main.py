"""Entry point: python -m tendon_grip.main <subcommand> ..."""
from tendon_grip.grip_cli.grip_cli import main

if __name__ == "__main__":
    main()
