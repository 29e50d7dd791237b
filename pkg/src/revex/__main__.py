from revex.cli import main

main()
