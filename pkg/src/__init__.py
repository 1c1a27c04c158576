# Anon Election Lab
