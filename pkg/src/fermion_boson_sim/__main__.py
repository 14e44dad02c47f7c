from fermion_boson_sim.cli.main import main

main()
