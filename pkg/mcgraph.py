import mcg.core

if __name__ == '__main__':
    mcg.core.main()
