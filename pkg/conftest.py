import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'dp3asym.settings')
django.setup()
