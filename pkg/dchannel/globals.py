"""Constants shared across the simulator."""

# Choose variable names wisely as they will be imported all over the package

from scipy import constants

# speed of light in vacuum, m/s
SPEED_OF_LIGHT = constants.c

# The measured sites, in campaign order
INDOOR_LOCATIONS = ('Sello', 'Airport', 'TUAS', 'TUAS2')
OUTDOOR_LOCATIONS = ('Campus', 'City', 'Residential')
LOCATIONS = INDOOR_LOCATIONS + OUTDOOR_LOCATIONS

SCENARIOS = ('LOS', 'NLOS')

# quantities fitted per (location, scenario) cell
QUANTITIES = ('npd', 'ndd', 'nop')

# Environment variable naming an alternative catalog file
CATALOG_ENV_VAR = 'DCHANNEL_CATALOG'

# ###########
# File Layout
# ###########

MPC_COLUMNS = ('location', 'link_id', 'scenario', 'distance_m', 'delay_ns',
               'power_dbm', 'aoa_deg', 'aod_deg')

REPORT_COLUMNS = ('location', 'scenario', 'quantity', 'family', 'status',
                  'n', 'ks_statistic', 'p_value', 'qq_correlation', 'loc',
                  'scale', 'shape', 'message')

NS = 1e-9
