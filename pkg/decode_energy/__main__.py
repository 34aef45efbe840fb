from decode_energy.app import create_app


def main():
    create_app()(prog_name="decode-energy")


if __name__ == "__main__":
    main()
