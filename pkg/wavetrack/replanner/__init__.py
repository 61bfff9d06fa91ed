"""Online replanning loop: triggers, level choice and reinitialisation."""
