# BDD Features package
