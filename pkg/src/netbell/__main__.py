from netbell.cli import main

main()
