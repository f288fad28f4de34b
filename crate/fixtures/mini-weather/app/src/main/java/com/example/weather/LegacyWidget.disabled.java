package com.example.weather;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;

import java.io.InputStream;

// Kept for reference; excluded from scanning by its file name.
public class LegacyWidget extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        View button = findViewById(R.id.forecast_refresh);
        button.setOnClickListener(new View.OnClickListener() {
            @Override
            public void onClick(View v) {
                finish();
            }
        });
        Intent again = new Intent(this, LegacyWidget.class);
        again.putExtra("again", true);
    }

    void drain(InputStream in) throws java.io.IOException {
        in.close();
    }
}
