import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "symspace.settings")
django.setup()
