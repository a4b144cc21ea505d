"""Process algebra with player/opponent choice and a playing operator."""
