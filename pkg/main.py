# main.py

from src.experiment_cli import cli


# ======================================================
#   Punto de entrada
# ======================================================
#
#   python main.py analyze  --sweep relays=0,1,2,4,8
#   python main.py simulate --sweep n=20,40,60 --runs 5
#   python main.py allocate --target 0.01 --sweep relays=0,1,2,4,8
#   python main.py validate

if __name__ == "__main__":
    cli()
